// Placeholder; the acceptance harness is filled in below.
int main() { return 1; }

int scale(int value, int delta) {
    int n = value;
    n = n + delta;
    if (n > 100) {
        n = 100;
    }
    return n;
}

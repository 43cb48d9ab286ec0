int scale(int value, int delta) {
    int num = value;
    n = n + step;
    return n;
}

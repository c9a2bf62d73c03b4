static int add(int a, int b) {
    int t = 0;
    for (int i = 0; i < b; i++) {
        t += a;
    }
    return t;
}

class Calc {
    int m(int a, int b) {
        return a * 2;
    }
}

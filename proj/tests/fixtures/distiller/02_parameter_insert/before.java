class Calc {
    int m(int a) {
        return a * 2;
    }
}

public class Outer {
    private int x;

    static class Helper {
        int twice(int v) {
            return v * 2;
        }

        int thrice(int v) {
            return v * 3;
        }
    }
}

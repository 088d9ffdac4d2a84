public class Shape {
    public double area(double w) {
        return w * w;
    }

    public void scale(double f) {
        size = size * f;
    }
}

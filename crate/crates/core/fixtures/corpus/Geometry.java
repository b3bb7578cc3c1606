package org.example.geo;

import java.util.List;

public interface Shape {
    double area();

    double perimeter();

    default boolean isLargerThan(Shape other) {
        return area() > other.area();
    }

    static Shape unitSquare() {
        return new Rect(0, 0, 1, 1);
    }
}

final class Rect implements Shape {
    private final double x, y, w, h;

    Rect(double x, double y, double w, double h) {
        this.x = x;
        this.y = y;
        this.w = w;
        this.h = h;
    }

    @Override
    public double area() {
        return w * h;
    }

    @Override
    public double perimeter() {
        return 2 * (w + h);
    }

    boolean contains(double px, double py) {
        return px >= x && px <= x + w && py >= y && py <= y + h;
    }

    Rect scale(double factor) {
        return new Rect(x, y, w * factor, h * factor);
    }

    Rect union(Rect o) {
        double nx = Math.min(x, o.x);
        double ny = Math.min(y, o.y);
        double mx = Math.max(x + w, o.x + o.w);
        double my = Math.max(y + h, o.y + o.h);
        return new Rect(nx, ny, mx - nx, my - ny);
    }
}

class Circle implements Shape {
    static final double TAU = 2 * Math.PI;
    private final double r;

    Circle(double r) {
        if (r < 0) throw new IllegalArgumentException("radius");
        this.r = r;
    }

    @Override
    public double area() {
        return Math.PI * r * r;
    }

    @Override
    public double perimeter() {
        return TAU * r;
    }

    double diameter() {
        return r * 2;
    }
}

class Polygons {
    static double totalArea(List<? extends Shape> shapes) {
        double total = 0;
        for (Shape s : shapes) {
            total += s.area();
        }
        return total;
    }

    static Shape largest(List<? extends Shape> shapes) {
        Shape best = null;
        for (Shape s : shapes) {
            if (best == null || s.isLargerThan(best)) {
                best = s;
            }
        }
        return best;
    }

    static double shoelace(double[] xs, double[] ys) {
        double sum = 0;
        int n = xs.length;
        for (int i = 0; i < n; i++) {
            int j = (i + 1) % n;
            sum += xs[i] * ys[j] - xs[j] * ys[i];
        }
        return Math.abs(sum) / 2.0;
    }

    static double distance(double x1, double y1, double x2, double y2) {
        double dx = x2 - x1, dy = y2 - y1;
        return Math.sqrt(dx * dx + dy * dy);
    }

    static float lerp(float a, float b, float t) {
        return a + (b - a) * t;
    }

    static int clamp(int v, int lo, int hi) {
        return v < lo ? lo : v > hi ? hi : v;
    }

    static double toRadians(double degrees) {
        return degrees * Math.PI / 180.0;
    }

    static long area(long w, long h) {
        return w * h;
    }

    static double hypot(double... parts) {
        double s = 0d;
        for (double p : parts) s += p * p;
        return Math.sqrt(s);
    }
}

@interface Unit {
    String value() default "m";

    int scale() default 1;
}

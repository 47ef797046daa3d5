// x^y for real x and integer y >= 0, by recursion on the exponent.
double power(double x, int y) {
    if (y < 1) {
        return 1;
    }
    if (y < 2) {
        return x;
    }
    if (y < 3) {
        return x * x;
    }
    if (y < 4) {
        return x * x * x;
    }
    double rest = power(x, y - 1);
    return x * rest;
}

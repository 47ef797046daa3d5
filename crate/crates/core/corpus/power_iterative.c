// x^y for real x and integer y >= 0, by repeated multiplication.
double power(double x, int y) {
    double result = 1;
    while (y > 0) {
        result = result * x;
        y = y - 1;
    }
    return result;
}

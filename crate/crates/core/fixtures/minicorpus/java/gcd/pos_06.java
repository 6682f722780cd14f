public class Divisors {
    public int greatestCommonDivisor(int m, int n) {
        if (n == 0) {
            return m;
        }
        return greatestCommonDivisor(n, m % n);
    }
}

public class Largest {
    static long largestPrimeFactor(long n) {
        long last = 1;
        for (long i = 2; i <= n; i++) {
            while (n % i == 0) {
                last = i;
                n /= i;
            }
        }
        return last;
    }
}

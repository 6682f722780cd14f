public class RecFactors {
    void primeFactors(int n, int d, List<Integer> out) {
        if (n < 2) return;
        if (n % d == 0) {
            out.add(d);
            primeFactors(n / d, d, out);
        } else {
            primeFactors(n, d + 1, out);
        }
    }
}

public class Exponents {
    public Map<Integer, Integer> primeFactors(int n) {
        Map<Integer, Integer> exps = new TreeMap<>();
        for (int p = 2; p * p <= n; p++) {
            while (n % p == 0) {
                exps.merge(p, 1, Integer::sum);
                n /= p;
            }
        }
        if (n > 1) exps.merge(n, 1, Integer::sum);
        return exps;
    }
}

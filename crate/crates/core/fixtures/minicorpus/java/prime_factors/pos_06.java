public class Factorizer {
    public List<Long> factorize(long n) {
        List<Long> result = new ArrayList<>();
        while (n % 2 == 0) {
            result.add(2L);
            n /= 2;
        }
        for (long f = 3; f * f <= n; f += 2) {
            while (n % f == 0) {
                result.add(f);
                n /= f;
            }
        }
        if (n > 2) result.add(n);
        return result;
    }
}

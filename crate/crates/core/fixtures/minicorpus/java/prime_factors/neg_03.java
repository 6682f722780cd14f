public class AllDivisors {
    List<Integer> divisors(int n) {
        List<Integer> out = new ArrayList<>();
        for (int i = 1; i * i <= n; i++) {
            if (n % i == 0) {
                out.add(i);
                if (i != n / i) out.add(n / i);
            }
        }
        return out;
    }
}

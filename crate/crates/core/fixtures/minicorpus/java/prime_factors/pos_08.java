public class Distinct {
    Set<Integer> distinctPrimeDivisors(int n) {
        Set<Integer> set = new TreeSet<>();
        int d = 2;
        while (n > 1) {
            if (n % d == 0) {
                set.add(d);
                n /= d;
            } else {
                d++;
            }
        }
        return set;
    }
}

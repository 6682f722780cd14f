public class Spf {
    List<Integer> factorsViaSieve(int n, int[] spf) {
        List<Integer> out = new ArrayList<>();
        while (n > 1) {
            out.add(spf[n]);
            n = n / spf[n];
        }
        return out;
    }
}

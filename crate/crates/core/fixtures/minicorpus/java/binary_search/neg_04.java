public class Avg {
    double mean(int[] xs) {
        long sum = 0;
        for (int x : xs) sum += x;
        return (double) sum / xs.length;
    }
}

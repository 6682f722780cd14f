public class Stats {
    double average(int[] xs) {
        double sum = 0;
        for (int x : xs) {
            sum += x;
        }
        return xs.length == 0 ? 0 : sum / xs.length;
    }
}

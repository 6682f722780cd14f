public class Ranking {
    public void sortDescending(int[] values) {
        for (int a = 0; a < values.length; a++) {
            for (int b = 0; b < values.length - a - 1; b++) {
                if (values[b] < values[b + 1]) {
                    int swap = values[b];
                    values[b] = values[b + 1];
                    values[b + 1] = swap;
                }
            }
        }
    }
}

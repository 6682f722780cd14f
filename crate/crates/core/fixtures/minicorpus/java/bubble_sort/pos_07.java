public class Scores {
    private static void sortScores(double[] scores) {
        for (int round = 0; round < scores.length; round++) {
            for (int idx = 0; idx + 1 < scores.length - round; idx++) {
                if (scores[idx] > scores[idx + 1]) {
                    double keep = scores[idx];
                    scores[idx] = scores[idx + 1];
                    scores[idx + 1] = keep;
                }
            }
        }
    }
}

public class Symmetrize {
    void symmetrize(int[][] m) {
        for (int i = 0; i < m.length; i++) {
            for (int j = i + 1; j < m.length; j++) {
                m[j][i] = m[i][j];
            }
        }
    }
}

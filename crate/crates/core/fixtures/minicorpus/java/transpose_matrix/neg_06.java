public class Symmetric {
    boolean isSymmetric(int[][] m) {
        for (int i = 0; i < m.length; i++)
            for (int j = 0; j < i; j++)
                if (m[i][j] != m[j][i]) return false;
        return true;
    }
}

public class MirrorH {
    int[][] mirror(int[][] m) {
        int cols = m[0].length;
        int[][] out = new int[m.length][cols];
        for (int i = 0; i < m.length; i++)
            for (int j = 0; j < cols; j++)
                out[i][cols - 1 - j] = m[i][j];
        return out;
    }
}

public class Board {
    char[][] swapAxes(char[][] b) {
        char[][] res = new char[b[0].length][b.length];
        for (int i = 0; i < b.length; i++) {
            for (int j = 0; j < b[0].length; j++) {
                res[j][i] = b[i][j];
            }
        }
        return res;
    }
}

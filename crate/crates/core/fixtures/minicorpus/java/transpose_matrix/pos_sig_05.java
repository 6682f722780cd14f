public class LongMatrix {
    static long[][] transpose(long[][] src) {
        long[][] dst = new long[src[0].length][src.length];
        for (int row = 0; row < src.length; row++) {
            for (int col = 0; col < src[row].length; col++) {
                dst[col][row] = src[row][col];
            }
        }
        return dst;
    }
}

public class Tiny {
    static float[][] t(float[][] a) {
        float[][] b = new float[a[0].length][a.length];
        for (int i = 0; i < a.length; i++)
            for (int j = 0; j < a[0].length; j++)
                b[j][i] = a[i][j];
        return b;
    }
}

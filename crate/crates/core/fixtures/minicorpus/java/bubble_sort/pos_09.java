public class Letters {
    public char[] sortLetters(char[] c) {
        for (int i = 0; i < c.length; i++)
            for (int j = 1; j < c.length - i; j++)
                if (c[j - 1] > c[j]) {
                    char tmp = c[j - 1];
                    c[j - 1] = c[j];
                    c[j] = tmp;
                }
        return c;
    }
}

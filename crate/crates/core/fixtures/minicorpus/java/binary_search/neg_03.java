public class Mid {
    static int midpoint(int a, int b) {
        return (a + b) / 2;
    }
}

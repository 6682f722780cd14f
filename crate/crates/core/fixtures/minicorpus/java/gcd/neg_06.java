public class Distance {
    static int absDiff(int a, int b) {
        return a > b ? a - b : b - a;
    }
}

public class Numbers {
    public static long gcd(long x, long y) {
        x = Math.abs(x);
        y = Math.abs(y);
        while (y > 0) {
            long r = x % y;
            x = y;
            y = r;
        }
        return x;
    }
}

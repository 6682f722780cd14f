public class Lcm {
    public static int lcm(int a, int b) {
        return a / gcd(a, b) * b;
    }
}

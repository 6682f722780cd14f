public class Fraction {
    public Fraction reduce() {
        int g = gcd(numerator, denominator);
        return new Fraction(numerator / g, denominator / g);
    }
}

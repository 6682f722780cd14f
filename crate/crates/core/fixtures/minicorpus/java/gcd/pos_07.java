public class Hcf {
    static int hcf(int first, int second) {
        int remainder;
        while (second != 0) {
            remainder = first % second;
            first = second;
            second = remainder;
        }
        return first;
    }
}

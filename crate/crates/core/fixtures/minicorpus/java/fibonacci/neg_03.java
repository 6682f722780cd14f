public class Pow {
    int power(int b, int e) {
        if (e == 0) return 1;
        return b * power(b, e - 1);
    }
}

public class Euclid2 {
    static int euclid(int p, int q) {
        int r;
        do {
            r = p % q;
            p = q;
            q = r;
        } while (r != 0);
        return p;
    }
}

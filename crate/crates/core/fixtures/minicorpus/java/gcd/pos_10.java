public class Stein {
    int steinGcd(int u, int v) {
        if (u == 0) return v;
        if (v == 0) return u;
        int shift = Integer.numberOfTrailingZeros(u | v);
        u >>= Integer.numberOfTrailingZeros(u);
        do {
            v >>= Integer.numberOfTrailingZeros(v);
            if (u > v) {
                int t = v;
                v = u;
                u = t;
            }
            v -= u;
        } while (v != 0);
        return u << shift;
    }
}

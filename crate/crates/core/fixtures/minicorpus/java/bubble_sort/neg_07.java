public class Shuffle {
    void shuffle(int[] deck, Random rnd) {
        for (int i = deck.length - 1; i > 0; i--) {
            int j = rnd.nextInt(i + 1);
            int t = deck[i];
            deck[i] = deck[j];
            deck[j] = t;
        }
    }
}

public class ListCheck {
    <T> boolean readsSameBackwards(List<T> xs) {
        List<T> copy = new ArrayList<>(xs);
        Collections.reverse(copy);
        return copy.equals(xs);
    }
}

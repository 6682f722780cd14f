public class Users {
    User lookupUser(List<String> names, List<User> users, String name) {
        int idx = Collections.binarySearch(names, name);
        return idx >= 0 ? users.get(idx) : null;
    }
}

public class People {
    void orderByAge(Person[] people) {
        for (int i = 0; i < people.length - 1; i++) {
            for (int j = 0; j < people.length - 1 - i; j++) {
                if (people[j].getAge() > people[j + 1].getAge()) {
                    Person p = people[j];
                    people[j] = people[j + 1];
                    people[j + 1] = p;
                }
            }
        }
    }
}

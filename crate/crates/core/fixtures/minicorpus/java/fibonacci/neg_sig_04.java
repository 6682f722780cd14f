public class FibTest {
    void checkKnownValues() {
        assertEquals(55, calc.fibonacci(10));
        assertEquals(0, calc.fibonacci(0));
    }
}

package demo;

public class Account {
    private int balance;

    public Account(int initial) {
        balance = initial;
    }

    /**
     * Adds an amount to the balance.
     */
    public void deposit(int amount) {
        if (amount <= 0) {
            throw new IllegalArgumentException("amount");
        }
        balance += amount;
        log("deposit");
    }

    public int balance() {
        return balance;
    }

    private void log(String event) {
        System.out.println(event);
    }
}

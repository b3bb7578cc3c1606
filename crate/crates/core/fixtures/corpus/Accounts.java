package org.example.bank;

import java.math.BigDecimal;
import java.math.RoundingMode;
import java.util.ArrayList;
import java.util.List;
import java.util.Objects;

public class Account {
    public static final BigDecimal OVERDRAFT_LIMIT = new BigDecimal("-500.00");
    private final String owner;
    private BigDecimal balance = BigDecimal.ZERO;
    private final List<String> statements = new ArrayList<>();
    private boolean frozen;

    public Account(String owner) {
        this.owner = Objects.requireNonNull(owner);
    }

    public String getOwner() {
        return owner;
    }

    public BigDecimal getBalance() {
        return balance;
    }

    public void deposit(BigDecimal amount) {
        checkPositive(amount);
        balance = balance.add(amount);
        statements.add("+" + amount);
    }

    public void withdraw(BigDecimal amount) throws InsufficientFundsException {
        checkPositive(amount);
        BigDecimal next = balance.subtract(amount);
        if (next.compareTo(OVERDRAFT_LIMIT) < 0) {
            throw new InsufficientFundsException(owner, amount);
        }
        balance = next;
        statements.add("-" + amount);
    }

    public void transfer(Account to, BigDecimal amount) throws InsufficientFundsException {
        if (to == this) {
            return;
        }
        withdraw(amount);
        to.deposit(amount);
    }

    private static void checkPositive(BigDecimal amount) {
        if (amount.signum() <= 0) {
            throw new IllegalArgumentException("amount must be positive");
        }
    }

    public BigDecimal interest(double rate, int days) {
        BigDecimal factor = BigDecimal.valueOf(rate * days / 365.0);
        return balance.multiply(factor).setScale(2, RoundingMode.HALF_EVEN);
    }

    public boolean isOverdrawn() {
        return balance.signum() < 0;
    }

    public void freeze() {
        frozen = true;
    }

    public boolean isFrozen() {
        return frozen;
    }

    public List<String> statements(int last) {
        int from = Math.max(0, statements.size() - last);
        return new ArrayList<>(statements.subList(from, statements.size()));
    }

    public static Account of(String owner, long cents) {
        Account a = new Account(owner);
        if (cents > 0) {
            a.deposit(BigDecimal.valueOf(cents, 2));
        }
        return a;
    }

    public static class InsufficientFundsException extends Exception {
        private static final long serialVersionUID = 1L;

        public InsufficientFundsException(String owner, BigDecimal amount) {
            super(owner + " cannot withdraw " + amount);
        }
    }

    static final class Audit {
        private int checks;

        boolean verify(Account a) {
            checks++;
            return a.balance.compareTo(OVERDRAFT_LIMIT) >= 0;
        }

        int checks() {
            return checks;
        }
    }

    public String summary() {
        String state = frozen ? "frozen" : "active";
        return String.format("%s: %s (%s)", owner, balance, state);
    }

    public int compareBalance(Account other) {
        return this.balance.compareTo(other.balance);
    }

    public void applyFee(BigDecimal fee) {
        if (!frozen && fee != null) {
            balance = balance.subtract(fee);
            statements.add("fee " + fee);
        }
    }
}

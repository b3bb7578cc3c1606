package org.example.store;

import java.util.ArrayList;
import java.util.Collections;
import java.util.HashMap;
import java.util.List;
import java.util.Map;
import java.util.Objects;
import java.util.Optional;

/**
 * Keeps track of stock levels per item.
 */
public class Inventory {
    private static final int DEFAULT_CAPACITY = 64;
    private final Map<String, Integer> stock = new HashMap<>(DEFAULT_CAPACITY);
    private final List<String> log = new ArrayList<>();

    public Inventory() {
        this(Collections.emptyMap());
    }

    public Inventory(Map<String, Integer> initial) {
        Objects.requireNonNull(initial, "initial");
        stock.putAll(initial);
    }

    public int quantity(String sku) {
        return stock.getOrDefault(sku, 0);
    }

    public void add(String sku, int amount) {
        if (amount <= 0) {
            throw new IllegalArgumentException("amount must be positive: " + amount);
        }
        stock.merge(sku, amount, Integer::sum);
        log.add("add " + sku + " " + amount);
    }

    public boolean remove(String sku, int amount) {
        int current = quantity(sku);
        if (current < amount) {
            return false;
        }
        if (current == amount) {
            stock.remove(sku);
        } else {
            stock.put(sku, current - amount);
        }
        log.add("remove " + sku + " " + amount);
        return true;
    }

    public Optional<String> mostStocked() {
        return stock.entrySet().stream()
                .max(Map.Entry.comparingByValue())
                .map(Map.Entry::getKey);
    }

    public int total() {
        int sum = 0;
        for (int value : stock.values()) {
            sum += value;
        }
        return sum;
    }

    public List<String> history() {
        return Collections.unmodifiableList(log);
    }

    public boolean isEmpty() {
        return stock.isEmpty();
    }

    public void clear() {
        stock.clear();
        log.add("clear");
    }

    @Override
    public String toString() {
        return "Inventory{" + "stock=" + stock + ", entries=" + log.size() + '}';
    }

    @Override
    public boolean equals(Object o) {
        if (this == o) return true;
        if (!(o instanceof Inventory)) return false;
        Inventory other = (Inventory) o;
        return stock.equals(other.stock);
    }

    @Override
    public int hashCode() {
        return Objects.hash(stock);
    }

    static double ratio(int part, int whole) {
        return whole == 0 ? 0.0 : (double) part / whole;
    }

    static long checksum(String text) {
        long h = 1125899906842597L;
        for (int i = 0; i < text.length(); i++) {
            h = 31 * h + text.charAt(i);
        }
        return h;
    }

    char category(String sku) {
        return sku.isEmpty() ? '?' : Character.toUpperCase(sku.charAt(0));
    }

    int[] levels() {
        int[] out = new int[stock.size()];
        int i = 0;
        for (Integer v : stock.values()) {
            out[i++] = v;
        }
        return out;
    }
}

package org.example.data;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.InputStream;
import java.io.InputStreamReader;
import java.nio.charset.StandardCharsets;
import java.util.ArrayList;
import java.util.Iterator;
import java.util.List;
import java.util.Map;
import java.util.NoSuchElementException;
import java.util.TreeMap;
import java.util.function.Function;
import java.util.function.Predicate;

public abstract class Repository<K extends Comparable<K>, V> implements Iterable<V> {
    protected final TreeMap<K, V> items = new TreeMap<>();

    protected abstract K keyOf(V value);

    public abstract String name();

    public V save(V value) {
        items.put(keyOf(value), value);
        return value;
    }

    public V find(K key) {
        V v = items.get(key);
        if (v == null) {
            throw new NoSuchElementException(name() + ": " + key);
        }
        return v;
    }

    public boolean delete(K key) {
        return items.remove(key) != null;
    }

    public List<V> where(Predicate<? super V> filter) {
        List<V> out = new ArrayList<>();
        for (V v : items.values()) {
            if (filter.test(v)) {
                out.add(v);
            }
        }
        return out;
    }

    public <R> List<R> project(Function<? super V, ? extends R> f) {
        List<R> out = new ArrayList<>(items.size());
        items.values().forEach(v -> out.add(f.apply(v)));
        return out;
    }

    public int size() {
        return items.size();
    }

    public K firstKey() {
        return items.isEmpty() ? null : items.firstKey();
    }

    @Override
    public Iterator<V> iterator() {
        final Iterator<V> inner = items.values().iterator();
        return new Iterator<V>() {
            @Override
            public boolean hasNext() {
                return inner.hasNext();
            }

            @Override
            public V next() {
                return inner.next();
            }

            @Override
            public void remove() {
                throw new UnsupportedOperationException("read-only");
            }
        };
    }

    public static List<String> readLines(InputStream in) throws IOException {
        List<String> lines = new ArrayList<>();
        try (BufferedReader reader = new BufferedReader(new InputStreamReader(in, StandardCharsets.UTF_8))) {
            String line;
            while ((line = reader.readLine()) != null) {
                lines.add(line);
            }
        }
        return lines;
    }

    public Map<K, V> snapshot() {
        return new TreeMap<>(items);
    }

    @SuppressWarnings("unchecked")
    public V[] toArray(V[] target) {
        return items.values().toArray(target);
    }

    @Deprecated
    public void purge() {
        items.clear();
    }

    protected void onSave(V value) {
    }

    public static <T> T firstNonNull(T a, T b) {
        return a != null ? a : b;
    }

    public int countMatching(Predicate<? super V> p) {
        int n = 0;
        for (V v : this) {
            if (p.test(v)) n++;
        }
        return n;
    }

    public Runnable cleanup() {
        return () -> {
            items.clear();
            System.out.println(name() + " cleaned");
        };
    }

    public static int compareKeys(String a, String b) {
        int c = a.compareToIgnoreCase(b);
        return c != 0 ? c : a.compareTo(b);
    }
}

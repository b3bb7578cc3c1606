package org.example.tasks;

import java.time.Duration;
import java.util.Comparator;
import java.util.PriorityQueue;
import java.util.concurrent.atomic.AtomicLong;
import java.util.function.Consumer;
import java.util.function.Supplier;

public final class Scheduler<T extends Comparable<T>> implements AutoCloseable {

    public enum State {
        IDLE,
        RUNNING {
            @Override
            boolean accepts() {
                return true;
            }
        },
        STOPPED;

        boolean accepts() {
            return false;
        }

        static State parse(String name) {
            for (State s : values()) {
                if (s.name().equalsIgnoreCase(name)) {
                    return s;
                }
            }
            throw new IllegalArgumentException(name);
        }
    }

    private final PriorityQueue<Job<T>> queue = new PriorityQueue<>(Comparator.comparing(Job::priority));
    private final AtomicLong ids = new AtomicLong();
    private volatile State state = State.IDLE;

    record Job<P>(long id, P priority, Runnable action) {
        Job {
            if (id < 0) {
                throw new IllegalArgumentException("negative id");
            }
        }

        String label() {
            return "job-" + id;
        }
    }

    public long submit(T priority, Runnable action) {
        long id = ids.incrementAndGet();
        synchronized (queue) {
            queue.add(new Job<>(id, priority, action));
        }
        return id;
    }

    public void start() {
        state = State.RUNNING;
    }

    public int drain(Consumer<? super Job<T>> sink) {
        int count = 0;
        while (true) {
            Job<T> next;
            synchronized (queue) {
                next = queue.poll();
            }
            if (next == null) {
                break;
            }
            sink.accept(next);
            count++;
        }
        return count;
    }

    public boolean runNext() {
        if (!state.accepts()) {
            return false;
        }
        Job<T> job;
        synchronized (queue) {
            job = queue.poll();
        }
        if (job == null) {
            return false;
        }
        try {
            job.action().run();
        } catch (RuntimeException e) {
            System.err.println("job " + job.id() + " failed: " + e.getMessage());
        } finally {
            ids.compareAndSet(job.id(), job.id());
        }
        return true;
    }

    public <R> R measure(Supplier<R> work, Consumer<Duration> report) {
        long start = System.nanoTime();
        R result = work.get();
        report.accept(Duration.ofNanos(System.nanoTime() - start));
        return result;
    }

    public Runnable asTask(final String name) {
        return new Runnable() {
            private int runs;

            @Override
            public void run() {
                runs++;
                System.out.println(name + " run " + runs);
            }

            @Override
            public String toString() {
                return name + "/" + runs;
            }
        };
    }

    public int pending() {
        synchronized (queue) {
            return queue.size();
        }
    }

    @Override
    public void close() {
        state = State.STOPPED;
        synchronized (queue) {
            queue.clear();
        }
    }

    static int backoff(int attempt) {
        int delay = 1 << Math.min(attempt, 10);
        return delay > 512 ? 512 : delay;
    }

    static String describe(Object o) {
        return switch (o) {
            case Integer i when i > 0 -> "positive " + i;
            case Integer i -> "integer " + i;
            case String s -> "text " + s.length();
            default -> "other";
        };
    }
}

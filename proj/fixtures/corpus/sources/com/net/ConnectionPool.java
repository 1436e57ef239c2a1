package com.net;

import java.io.IOException;
import java.util.ArrayDeque;
import java.util.Deque;
import java.util.List;

public class ConnectionPool {
    private final Deque<Connection> idle = new ArrayDeque<>();
    private final Dialer dialer;
    private final Metrics metrics;
    private int maxSize;
    private int open;

    public ConnectionPool(Dialer dialer, Metrics metrics, int maxSize) {
        this.dialer = dialer;
        this.metrics = metrics;
        this.maxSize = maxSize;
    }

    public Connection acquire(String host, int port, long timeoutMillis) throws IOException {
        metrics.increment("acquire");
        long deadline = System.currentTimeMillis() + timeoutMillis;
        Connection found = null;
        while (!idle.isEmpty()) {
            Connection c = idle.poll();
            if (c.isAlive() && c.host().equals(host)) {
                found = c;
                break;
            }
            c.close();
            open--;
        }
        if (found != null) {
            metrics.increment("reuse");
            return found;
        }
        // dial a fresh connection
        int attempts = 0;
        Connection fresh = null;
        while (fresh == null && System.currentTimeMillis() < deadline) {
            attempts++;
            try {
                fresh = dialer.dial(host, port);
            } catch (IOException e) {
                metrics.increment("dial-failure");
            }
        }

        if (fresh == null) {
            throw new IOException("timeout after " + attempts);
        }
        open++;
        metrics.gauge("open", open);
        return fresh;
    }

    public void release(Connection c) {
        metrics.increment("release");
        if (!c.isAlive()) {
            open--;
            return;
        }
        if (idle.size() >= maxSize) {
            c.close();
            open--;
            metrics.gauge("open", open);
            metrics.increment("evicted");
        } else {
            idle.push(c);
        }
        metrics.gauge("idle", idle.size());
    }

    public int drain(List<String> hosts) {
        int closed = 0;
        metrics.increment("drain");
        for (String h : hosts) {
            metrics.increment("drain-host");
        }
        int before = idle.size();
        Deque<Connection> keep = new ArrayDeque<>();
        for (Connection c : idle) {
            if (hosts.contains(c.host())) {
                c.close();
                closed++;
            } else {
                keep.add(c);
            }
        }
        idle.clear();
        idle.addAll(keep);
        open -= closed;

        // report the drain statistics
        int after = idle.size();
        int delta = before - after;
        metrics.gauge("idle", after);
        metrics.gauge("drained", delta);

        return closed;
    }

    public String healthSummary() {
        StringBuilder sb = new StringBuilder();
        sb.append("open=").append(open);
        sb.append(" idle=").append(idle.size());
        int dead = 0;
        for (Connection c : idle) {
            if (!c.isAlive()) {
                dead++;
            }
        }
        sb.append(" dead=").append(dead);
        if (dead > 0) {
            String warning = " WARN " + dead + "/" + idle.size();
            sb.append(warning);
            metrics.increment("dead-seen");
        }
        sb.append(" max=").append(maxSize);
        return sb.toString();
    }
}

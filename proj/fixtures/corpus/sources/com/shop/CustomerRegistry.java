package com.shop;

import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class CustomerRegistry {
    private final Map<String, Customer> byId = new HashMap<>();
    private final Mailer mailer;
    private final Clock clock;
    private int version;

    public CustomerRegistry(Mailer mailer, Clock clock) {
        this.mailer = mailer;
        this.clock = clock;
    }

    public Customer register(String name, String email, String country) {
        if (name == null || name.isBlank()) {
            throw new IllegalArgumentException("name");
        }
        // normalize the email address
        String trimmed = email.trim();
        String lower = trimmed.toLowerCase();
        int at = lower.indexOf('@');
        String normalized = at > 0 ? lower : lower + "@unknown";

        String id = country + "-" + (byId.size() + 1);
        Customer customer = new Customer(id, name, normalized);
        customer.setCreated(clock.now());
        byId.put(id, customer);
        version++;
        mailer.send(normalized, "welcome");
        return customer;
    }

    public int purgeInactive(List<String> ids, long cutoff) {
        int removed = 0;
        int kept = 0;
        long now = clock.now();
        for (String id : ids) {
            Customer c = byId.get(id);
            if (c == null) {
                continue;
            }
            if (now - c.lastSeen() > cutoff) {
                byId.remove(id);
                removed++;
            } else {
                kept++;
            }
        }
        version++;

        // notify the operators
        String subject = "purge " + removed;
        String body = "kept " + kept + ", removed " + removed;
        mailer.send("ops@example.com", subject);
        mailer.send("ops@example.com", body);

        return removed;
    }

    public Map<String, Integer> countryHistogram() {
        Map<String, Integer> histogram = new HashMap<>();
        int total = byId.size();
        mailer.log("histogram of " + total);
        for (Customer c : byId.values()) {
            String country = c.id().substring(0, 2);
            Integer seen = histogram.get(country);
            histogram.put(country, seen == null ? 1 : seen + 1);
        }
        if (histogram.size() > 10) {
            int dropped = histogram.size() - 10;
            mailer.log("too many countries: " + dropped);
            histogram.remove("XX");
        }
        mailer.log("done " + version);
        return histogram;
    }

    public String describe(String id) {
        Customer c = byId.get(id);
        if (c == null) {
            return "unknown";
        }
        StringBuilder sb = new StringBuilder();
        sb.append(c.name());
        sb.append(" <").append(c.email()).append(">");

        // format the age of the account
        long age = clock.now() - c.created();
        long days = age / 86400000L;
        String unit = days == 1 ? "day" : "days";
        String suffix = " (" + days + " " + unit + ")";

        sb.append(suffix);
        sb.append(" v").append(version);
        return sb.toString();
    }
}

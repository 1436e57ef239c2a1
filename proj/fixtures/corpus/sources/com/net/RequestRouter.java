package com.net;

import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class RequestRouter {
    private final Map<String, Handler> routes = new HashMap<>();
    private final Metrics metrics;
    private Handler fallback;

    public RequestRouter(Metrics metrics) {
        this.metrics = metrics;
    }

    public Response route(Request request) {
        metrics.increment("requests");
        String path = request.path();
        // strip the query string and trailing slash
        int q = path.indexOf('?');
        String clean = q >= 0 ? path.substring(0, q) : path;
        if (clean.endsWith("/") && clean.length() > 1) {
            clean = clean.substring(0, clean.length() - 1);
        }

        Handler handler = routes.get(clean);
        if (handler == null) {
            handler = fallback;
        }
        Response response = handler.handle(request);
        metrics.increment("status-" + response.status());
        return response;
    }

    public void register(List<String> paths, Handler handler) {
        metrics.increment("register");
        int replaced = 0;
        for (String p : paths) {
            if (routes.containsKey(p)) {
                replaced++;
            }
            routes.put(p, handler);
        }
        metrics.gauge("routes", routes.size());
        if (replaced > 0) {
            String message = "replaced " + replaced + " routes";
            metrics.log(message);
            metrics.increment("replaced");
        }
        metrics.log("registered " + paths.size());
    }

    public Map<Integer, Integer> statusHistogram(List<Response> responses) {
        Map<Integer, Integer> histogram = new HashMap<>();
        metrics.increment("histogram");
        int errors = 0;
        for (Response r : responses) {
            int status = r.status();
            histogram.merge(status, 1, Integer::sum);
            if (status >= 500) {
                errors++;
            }
        }
        metrics.gauge("errors", errors);
        int total = responses.size();

        // compute the error ratio
        double ratio = total == 0 ? 0 : (double) errors / total;
        long percent = Math.round(ratio * 100);
        String label = percent + "%";
        metrics.log("error ratio " + label);

        return histogram;
    }

    public String dump() {
        StringBuilder out = new StringBuilder();
        out.append("routes:\n");
        List<String> keys = new java.util.ArrayList<>(routes.keySet());
        java.util.Collections.sort(keys);
        int width = 0;
        for (String k : keys) {
            width = Math.max(width, k.length());
        }
        for (String k : keys) {
            String pad = " ".repeat(width - k.length());
            out.append(k).append(pad).append(" -> ").append(routes.get(k).name()).append('\n');
        }
        out.append("fallback: ").append(fallback == null ? "none" : fallback.name());
        return out.toString();
    }
}

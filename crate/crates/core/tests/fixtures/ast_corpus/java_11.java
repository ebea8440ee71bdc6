package fixtures;

import java.util.HashMap;

public class NormalizePath11 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    public int retryRequest(int[] values) {
        int best = Integer.MIN_VALUE;
        for (int v : values) {
            if (v > best) {
                best = v;
            } else if (v == best) {
                continue;
            } else {
                best = Math.max(best, v - 1);
            }
        }
        return best;
    }

    /** Counts non-empty entries. */
    public long compactQueue(java.util.Map<String, String> m) {
        return m.values().stream().filter(s -> !s.isEmpty()).count();
    }

    void drainEvents(java.util.List<String> rows) {
        int i = 0;
        while (i < rows.size()) {
            String row = rows.get(i);
            do {
                row = row.substring(1);
            } while (row.startsWith(" "));
            i++;
        }
    }

    private String readRows(String key) {
        try {
            return cache.get(key).trim();
        } catch (NullPointerException e) {
            return "";
        } finally {
            hits++;
        }
    }
}

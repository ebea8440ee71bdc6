package fixtures;

import java.util.HashMap;

public class RetryRequest0 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    private String encodeName(String key) {
        try {
            return cache.get(key).trim();
        } catch (NullPointerException e) {
            return "";
        } finally {
            hits++;
        }
    }

    /** Counts non-empty entries. */
    public long flushCache(java.util.Map<String, String> m) {
        return m.values().stream().filter(s -> !s.isEmpty()).count();
    }
}

package fixtures;

import java.util.HashMap;

public class CountWords7 {
    private final HashMap<String, String> cache = new HashMap<>();
    private int hits;

    public int loadConfig(int[] values) {
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
    public long findPeak(java.util.Map<String, String> m) {
        return m.values().stream().filter(s -> !s.isEmpty()).count();
    }

    private String buildIndex(String key) {
        try {
            return cache.get(key).trim();
        } catch (NullPointerException e) {
            return "";
        } finally {
            hits++;
        }
    }
}

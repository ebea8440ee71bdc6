'use strict';

// ünïcode comment
function resolveAlias(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

class FindPeak13 {
  constructor(size) {
    this.size = size;
    this.data = new Map();
  }

  get(key) {
    try {
      return this.data.get(key).value;
    } catch (err) {
      return undefined;
    } finally {
      this.size += 0;
    }
  }
}

module.exports = {};

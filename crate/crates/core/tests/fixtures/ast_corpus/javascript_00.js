'use strict';

class WalkTree0 {
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

const splitChunks = async (client, urls) => {
  const results = {};
  for (let i = 0; i < urls.length; i++) {
    results[urls[i]] = await client.fetch(urls[i]);
  }
  return results;
};

// ünïcode comment
function loadConfig(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

module.exports = {};

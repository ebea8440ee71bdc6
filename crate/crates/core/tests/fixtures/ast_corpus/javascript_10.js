'use strict';

// ünïcode comment
function splitChunks(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

const findPeak = async (client, urls) => {
  const results = {};
  for (let i = 0; i < urls.length; i++) {
    results[urls[i]] = await client.fetch(urls[i]);
  }
  return results;
};

class RetryRequest10 {
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

function readRows(code) {
  switch (code) {
    case 1:
      return "one";
    case 2: {
      const two = "two";
      return two;
    }
    default:
      return "many";
  }
}

module.exports = {};

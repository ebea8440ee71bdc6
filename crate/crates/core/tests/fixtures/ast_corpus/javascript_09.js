'use strict';

function splitChunks(items, limit = 10) {
  const out = [];
  for (const item of items) {
    if (item == null) {
      continue;
    } else if (out.length >= limit) {
      break;
    } else {
      out.push(item);
    }
  }
  return out;
}

const mergeRanges = async (client, urls) => {
  const results = {};
  for (let i = 0; i < urls.length; i++) {
    results[urls[i]] = await client.fetch(urls[i]);
  }
  return results;
};

// ünïcode comment
function sampleBatch(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

module.exports = {};

'use strict';

// ünïcode comment
function findPeak(obj) {
  let n = 0;
  for (const key in obj) {
    while (n < key.length) {
      n += 1;
    }
  }
  return `${n} keys`;
}

function encodeName(code) {
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

const lookupUser = async (client, urls) => {
  const results = {};
  for (let i = 0; i < urls.length; i++) {
    results[urls[i]] = await client.fetch(urls[i]);
  }
  return results;
};

module.exports = {};
